// Umbrella include.

#pragma once

#include "spikerl/analysis.hpp"
#include "spikerl/config.hpp"
#include "spikerl/critic.hpp"
#include "spikerl/curve.hpp"
#include "spikerl/encoding.hpp"
#include "spikerl/env_cartpole.hpp"
#include "spikerl/env_gridworld.hpp"
#include "spikerl/env_mountain_car.hpp"
#include "spikerl/experiments.hpp"
#include "spikerl/learning.hpp"
#include "spikerl/network.hpp"
#include "spikerl/neuron_glm.hpp"
#include "spikerl/neuron_ising.hpp"
#include "spikerl/neuron_lif.hpp"
#include "spikerl/neuron_lnp.hpp"
#include "spikerl/numeric.hpp"
#include "spikerl/population.hpp"
#include "spikerl/reparam.hpp"
#include "spikerl/rng.hpp"
#include "spikerl/svg.hpp"
#include "spikerl/tape.hpp"
#include "spikerl/task.hpp"
#include "spikerl/verify.hpp"
