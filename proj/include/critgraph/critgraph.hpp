#pragma once

#include "critgraph/distributions.hpp"
#include "critgraph/errors.hpp"
#include "critgraph/finite_graph.hpp"
#include "critgraph/kernel.hpp"
#include "critgraph/limit_sampler.hpp"
#include "critgraph/metric_tree.hpp"
#include "critgraph/montecarlo.hpp"
#include "critgraph/process.hpp"
#include "critgraph/rng.hpp"
#include "critgraph/stats.hpp"
#include "critgraph/urn.hpp"
