#pragma once

#include "asymptotics.hpp"
#include "core_model.hpp"
#include "ep_finder.hpp"
#include "parallel.hpp"
#include "pt_symmetry.hpp"
#include "quasimomentum.hpp"
#include "serialize.hpp"
#include "topology.hpp"
#include "types.hpp"
