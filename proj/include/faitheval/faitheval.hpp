#pragma once

#include "faitheval/core.hpp"
#include "faitheval/corpus.hpp"
#include "faitheval/diagnosticity.hpp"
#include "faitheval/experiment.hpp"
#include "faitheval/interpret.hpp"
#include "faitheval/io.hpp"
#include "faitheval/linalg.hpp"
#include "faitheval/metrics.hpp"
#include "faitheval/model.hpp"
#include "faitheval/report.hpp"
#include "faitheval/rng.hpp"
