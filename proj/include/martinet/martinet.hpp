#pragma once

#include "martinet/classical.hpp"
#include "martinet/elliptic.hpp"
#include "martinet/errors.hpp"
#include "martinet/grid.hpp"
#include "martinet/io.hpp"
#include "martinet/montgomery.hpp"
#include "martinet/parallel.hpp"
#include "martinet/quadrature.hpp"
#include "martinet/roots.hpp"
#include "martinet/semiclassical.hpp"
#include "martinet/spectrum.hpp"
#include "martinet/version.hpp"
