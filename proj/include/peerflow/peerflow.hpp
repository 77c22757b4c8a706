#pragma once

#include "peerflow/config.hpp"
#include "peerflow/config_io.hpp"
#include "peerflow/figures.hpp"
#include "peerflow/io.hpp"
#include "peerflow/metrics.hpp"
#include "peerflow/quality.hpp"
#include "peerflow/review.hpp"
#include "peerflow/rng.hpp"
#include "peerflow/sweep.hpp"
#include "peerflow/systems.hpp"
