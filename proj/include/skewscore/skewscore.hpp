#pragma once

#include "skewscore/analytic.hpp"
#include "skewscore/config.hpp"
#include "skewscore/dag.hpp"
#include "skewscore/datagen.hpp"
#include "skewscore/gp.hpp"
#include "skewscore/io.hpp"
#include "skewscore/kci.hpp"
#include "skewscore/kernel.hpp"
#include "skewscore/laws.hpp"
#include "skewscore/mechanism.hpp"
#include "skewscore/metrics.hpp"
#include "skewscore/mlp.hpp"
#include "skewscore/oracles.hpp"
#include "skewscore/ordering.hpp"
#include "skewscore/pipeline.hpp"
#include "skewscore/prune.hpp"
#include "skewscore/quadrature.hpp"
#include "skewscore/rng.hpp"
#include "skewscore/ssm.hpp"
#include "skewscore/stein.hpp"
#include "skewscore/types.hpp"
