#pragma once

#include "checks.hpp"
#include "exponents.hpp"
#include "integrals.hpp"
#include "moments.hpp"
#include "multiindex.hpp"
#include "plans.hpp"
#include "polynomial_path.hpp"
#include "rate_formulas.hpp"
#include "rates.hpp"
#include "schemes.hpp"
#include "serialize.hpp"
#include "signal.hpp"
#include "vector_field.hpp"
