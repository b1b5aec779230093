#pragma once

#include "finqa/attention.hpp"
#include "finqa/dataset.hpp"
#include "finqa/dsl.hpp"
#include "finqa/equivalence.hpp"
#include "finqa/error.hpp"
#include "finqa/executor.hpp"
#include "finqa/fusion.hpp"
#include "finqa/grammar.hpp"
