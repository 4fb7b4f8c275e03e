#pragma once

#include "cnds/base_flow.hpp"
#include "cnds/chain.hpp"
#include "cnds/cocycle.hpp"
#include "cnds/config.hpp"
#include "cnds/conley.hpp"
#include "cnds/energy.hpp"
#include "cnds/errors.hpp"
#include "cnds/grid.hpp"
#include "cnds/lyapunov.hpp"
#include "cnds/pipeline.hpp"
#include "cnds/pullback.hpp"
#include "cnds/systems.hpp"
#include "cnds/transition.hpp"
