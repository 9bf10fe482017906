#pragma once

#include <gausscomb/channels.hpp>
#include <gausscomb/config.hpp>
#include <gausscomb/covariance_io.hpp>
#include <gausscomb/dynamics.hpp>
#include <gausscomb/experiment.hpp>
#include <gausscomb/gaussian.hpp>
#include <gausscomb/lyapunov.hpp>
#include <gausscomb/modes.hpp>
#include <gausscomb/pump_graph.hpp>
#include <gausscomb/scenario.hpp>
#include <gausscomb/seeding.hpp>
#include <gausscomb/sweep.hpp>
