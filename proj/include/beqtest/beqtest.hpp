#pragma once

#include "beqtest/core.hpp"
#include "beqtest/coverage.hpp"
#include "beqtest/error.hpp"
#include "beqtest/evaluator.hpp"
#include "beqtest/falsify.hpp"
#include "beqtest/format.hpp"
#include "beqtest/io.hpp"
#include "beqtest/lazy_build.hpp"
#include "beqtest/ledger.hpp"
#include "beqtest/milp.hpp"
#include "beqtest/module.hpp"
#include "beqtest/refinement.hpp"
#include "beqtest/relu_network.hpp"
