#pragma once

// Umbrella header.
#include "dgt/backprop.hpp"
#include "dgt/bandit.hpp"
#include "dgt/batch_train.hpp"
#include "dgt/data.hpp"
#include "dgt/errors.hpp"
#include "dgt/forest.hpp"
#include "dgt/linalg.hpp"
#include "dgt/losses.hpp"
#include "dgt/metrics.hpp"
#include "dgt/model_io.hpp"
#include "dgt/optimizer.hpp"
#include "dgt/path_tables.hpp"
#include "dgt/tree.hpp"
#include "dgt/tree_params.hpp"
