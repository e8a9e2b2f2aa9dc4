#pragma once

#include "trustlens/config.hpp"
#include "trustlens/dataset.hpp"
#include "trustlens/error.hpp"
#include "trustlens/evaluation.hpp"
#include "trustlens/metrics.hpp"
#include "trustlens/opinion.hpp"
#include "trustlens/predictor.hpp"
#include "trustlens/report.hpp"
#include "trustlens/similarity.hpp"
#include "trustlens/trust_graph.hpp"
#include "trustlens/trust_map.hpp"
