#pragma once

#include "grasp/config.hpp"
#include "grasp/csp.hpp"
#include "grasp/decoder.hpp"
#include "grasp/error.hpp"
#include "grasp/evaluate.hpp"
#include "grasp/filter.hpp"
#include "grasp/folds.hpp"
#include "grasp/gating.hpp"
#include "grasp/io/brainvision.hpp"
#include "grasp/io/session_bundle.hpp"
#include "grasp/lda.hpp"
#include "grasp/model_io.hpp"
#include "grasp/preprocess.hpp"
#include "grasp/report.hpp"
#include "grasp/segment_length.hpp"
#include "grasp/synth.hpp"
#include "grasp/types.hpp"
