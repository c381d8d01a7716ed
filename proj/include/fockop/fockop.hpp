#pragma once

#include "fockop/errors.hpp"
#include "fockop/log_math.hpp"
#include "fockop/symbols.hpp"
#include "fockop/weights.hpp"
#include "fockop/quadrature.hpp"
#include "fockop/operators.hpp"
#include "fockop/classify.hpp"
#include "fockop/verify.hpp"
#include "fockop/config.hpp"
#include "fockop/report.hpp"
