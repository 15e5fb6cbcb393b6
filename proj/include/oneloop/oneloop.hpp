#pragma once

#include "oneloop/errors.hpp"
#include "oneloop/expr.hpp"
#include "oneloop/model.hpp"
#include "oneloop/numeric.hpp"
#include "oneloop/path.hpp"
#include "oneloop/covariant.hpp"
#include "oneloop/effective.hpp"
#include "oneloop/tracelog.hpp"
#include "oneloop/dynamics.hpp"
#include "oneloop/reparam.hpp"
#include "oneloop/config.hpp"
#include "oneloop/commands.hpp"
