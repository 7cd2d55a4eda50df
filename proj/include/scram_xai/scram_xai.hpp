#pragma once

// Everything in one include.
#include "scram_xai/adam.hpp"
#include "scram_xai/anomaly_detector.hpp"
#include "scram_xai/autoencoder.hpp"
#include "scram_xai/benchmark.hpp"
#include "scram_xai/checkpoint.hpp"
#include "scram_xai/config.hpp"
#include "scram_xai/corpus.hpp"
#include "scram_xai/csv.hpp"
#include "scram_xai/data_pipeline.hpp"
#include "scram_xai/errors.hpp"
#include "scram_xai/evaluation.hpp"
#include "scram_xai/lstm.hpp"
#include "scram_xai/reactor_sim.hpp"
#include "scram_xai/replay_attack.hpp"
#include "scram_xai/series.hpp"
#include "scram_xai/shap_explainer.hpp"
#include "scram_xai/signals.hpp"
#include "scram_xai/svg.hpp"
#include "scram_xai/training.hpp"
