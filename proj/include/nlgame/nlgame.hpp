/**
 * @file nlgame.hpp
 * @brief Umbrella header.
 */

#ifndef NLGAME_NLGAME_HPP
#define NLGAME_NLGAME_HPP

#include "nlgame/drbsde.hpp"
#include "nlgame/dynkin_oracle.hpp"
#include "nlgame/errors.hpp"
#include "nlgame/generators.hpp"
#include "nlgame/model_core.hpp"
#include "nlgame/pricing.hpp"
#include "nlgame/replication.hpp"
#include "nlgame/stopping_rule.hpp"

#endif  // NLGAME_NLGAME_HPP
