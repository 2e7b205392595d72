// smoothop/smoothop.hpp — umbrella include.

#pragma once

#include "smoothop/calculus.hpp"
#include "smoothop/config.hpp"
#include "smoothop/diagnostics.hpp"
#include "smoothop/graded.hpp"
#include "smoothop/io.hpp"
#include "smoothop/jacobi.hpp"
#include "smoothop/matrix.hpp"
#include "smoothop/models.hpp"
#include "smoothop/run.hpp"
#include "smoothop/span.hpp"
#include "smoothop/spectral.hpp"
#include "smoothop/subalgebra.hpp"
#include "smoothop/version.hpp"
