#pragma once

#include "sdg/belief.hpp"
#include "sdg/closed_form.hpp"
#include "sdg/error.hpp"
#include "sdg/finite_game.hpp"
#include "sdg/game_io.hpp"
#include "sdg/game_model.hpp"
#include "sdg/grid.hpp"
#include "sdg/instances.hpp"
#include "sdg/matrix_game.hpp"
#include "sdg/reduced.hpp"
#include "sdg/side.hpp"
#include "sdg/solver.hpp"
#include "sdg/stage_duration.hpp"
#include "sdg/verify.hpp"
