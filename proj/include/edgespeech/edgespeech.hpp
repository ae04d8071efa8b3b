#pragma once

// Umbrella header: the whole engine in one include.

#include "edgespeech/acoustic_model.hpp"
#include "edgespeech/alphabet.hpp"
#include "edgespeech/audio.hpp"
#include "edgespeech/decoder.hpp"
#include "edgespeech/features.hpp"
#include "edgespeech/model_io.hpp"
#include "edgespeech/nn.hpp"
#include "edgespeech/pipeline.hpp"
#include "edgespeech/profiler.hpp"
#include "edgespeech/storage.hpp"
#include "edgespeech/trie.hpp"
#include "edgespeech/wer.hpp"
