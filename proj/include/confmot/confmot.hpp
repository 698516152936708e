#pragma once

#include "confmot/ablation.hpp"
#include "confmot/assignment.hpp"
#include "confmot/domain.hpp"
#include "confmot/ensemble.hpp"
#include "confmot/evaluation.hpp"
#include "confmot/io.hpp"
#include "confmot/keyvalue.hpp"
#include "confmot/lifecycle.hpp"
#include "confmot/motion.hpp"
#include "confmot/random.hpp"
#include "confmot/report.hpp"
#include "confmot/score.hpp"
#include "confmot/synth.hpp"
#include "confmot/tracker.hpp"
