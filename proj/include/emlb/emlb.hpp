#pragma once

#include "emlb/balance.hpp"
#include "emlb/corpus.hpp"
#include "emlb/evolving_graph.hpp"
#include "emlb/harness.hpp"
#include "emlb/matchers.hpp"
#include "emlb/rng.hpp"
#include "emlb/theory.hpp"
#include "emlb/token_ledger.hpp"
#include "emlb/verification.hpp"
