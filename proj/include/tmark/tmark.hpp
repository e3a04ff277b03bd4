#pragma once

#include "tmark/decision_tree.hpp"
#include "tmark/ensemble.hpp"
#include "tmark/error.hpp"
#include "tmark/eval.hpp"
#include "tmark/extraction.hpp"
#include "tmark/features.hpp"
#include "tmark/lemmatizer.hpp"
#include "tmark/models.hpp"
#include "tmark/rng.hpp"
#include "tmark/treebank.hpp"
