// Copyright 2026 The preorder Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "preorder/alignment.hpp"
#include "preorder/bleu.hpp"
#include "preorder/corpus_io.hpp"
#include "preorder/dep_tree.hpp"
#include "preorder/mbr.hpp"
#include "preorder/ngram_lm.hpp"
#include "preorder/parallel.hpp"
#include "preorder/phrase_extract.hpp"
#include "preorder/pipeline.hpp"
#include "preorder/postedit.hpp"
#include "preorder/reorder_rules.hpp"
#include "preorder/symmetrize.hpp"
#include "preorder/text.hpp"
