// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "adaptkit/adapt.hpp"
#include "adaptkit/bench.hpp"
#include "adaptkit/builtins.hpp"
#include "adaptkit/bundle.hpp"
#include "adaptkit/circular_queue.hpp"
#include "adaptkit/core.hpp"
#include "adaptkit/dsp/conv.hpp"
#include "adaptkit/dsp/filters.hpp"
#include "adaptkit/dsp/mel.hpp"
#include "adaptkit/dsp/stft.hpp"
#include "adaptkit/dsp/tcn.hpp"
#include "adaptkit/offline.hpp"
#include "adaptkit/processor.hpp"
#include "adaptkit/resampler.hpp"
#include "adaptkit/rtwrap.hpp"
#include "adaptkit/sandwich.hpp"
#include "adaptkit/simulate.hpp"
#include "adaptkit/wav.hpp"
