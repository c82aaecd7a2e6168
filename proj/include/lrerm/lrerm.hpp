#pragma once

#include "banach_concentration.hpp"
#include "config.hpp"
#include "consistency_lab.hpp"
#include "dictionary.hpp"
#include "erm_solver.hpp"
#include "io.hpp"
#include "losses.hpp"
#include "lr_core.hpp"
#include "parallel.hpp"
#include "regularizers.hpp"
#include "rng.hpp"
#include "runner.hpp"
#include "sobolev_pkernel.hpp"
