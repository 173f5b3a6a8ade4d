#pragma once

#include "dispersmooth/types.hpp"
#include "dispersmooth/parallel.hpp"
#include "dispersmooth/rng.hpp"
#include "dispersmooth/quadrature.hpp"
#include "dispersmooth/fft.hpp"
#include "dispersmooth/grid.hpp"
#include "dispersmooth/symbols.hpp"
#include "dispersmooth/engine.hpp"
#include "dispersmooth/norms.hpp"
#include "dispersmooth/comparison.hpp"
#include "dispersmooth/canonical.hpp"
#include "dispersmooth/constants.hpp"
#include "dispersmooth/inhomog.hpp"
#include "dispersmooth/harness/report.hpp"
#include "dispersmooth/harness/criteria.hpp"
#include "dispersmooth/harness/suite.hpp"
#include "dispersmooth/harness/scenario.hpp"
#include "dispersmooth/harness/run.hpp"
