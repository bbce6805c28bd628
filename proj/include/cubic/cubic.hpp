#pragma once

#include "cubic/archimedean.hpp"
#include "cubic/bounds.hpp"
#include "cubic/circle_method.hpp"
#include "cubic/cyclotomic.hpp"
#include "cubic/error.hpp"
#include "cubic/expsums.hpp"
#include "cubic/ff_geometry.hpp"
#include "cubic/finite_field.hpp"
#include "cubic/integer.hpp"
#include "cubic/matrix.hpp"
#include "cubic/padic.hpp"
#include "cubic/parallel.hpp"
#include "cubic/poly_json.hpp"
#include "cubic/polynomial.hpp"
#include "cubic/serialize.hpp"
#include "cubic/singular_series.hpp"
#include "cubic/slicing.hpp"
