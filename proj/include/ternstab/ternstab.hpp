#ifndef TERNSTAB_TERNSTAB_HPP
#define TERNSTAB_TERNSTAB_HPP

#include "scalar.hpp"
#include "tensor.hpp"
#include "algebra.hpp"
#include "module.hpp"
#include "linear_map.hpp"
#include "bracket.hpp"
#include "derivation_solver.hpp"
#include "unimodular.hpp"
#include "control.hpp"
#include "evaluable_map.hpp"
#include "hyers.hpp"
#include "perturbation.hpp"
#include "stabilize.hpp"
#include "hypothesis.hpp"
#include "serialization.hpp"
#include "experiment.hpp"

#endif
