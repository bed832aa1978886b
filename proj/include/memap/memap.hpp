#ifndef MEMAP_MEMAP_HPP
#define MEMAP_MEMAP_HPP

#include <memap/archive.hpp>
#include <memap/cmaes.hpp>
#include <memap/config.hpp>
#include <memap/emitters.hpp>
#include <memap/engine.hpp>
#include <memap/experiment.hpp>
#include <memap/io.hpp>
#include <memap/metrics.hpp>
#include <memap/scheduler.hpp>
#include <memap/stats.hpp>
#include <memap/tasks.hpp>

#endif
