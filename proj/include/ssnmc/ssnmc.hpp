#pragma once

#include "ssnmc/error.hpp"
#include "ssnmc/tensor.hpp"
#include "ssnmc/linalg.hpp"
#include "ssnmc/hyperdual.hpp"
#include "ssnmc/polynomial.hpp"
#include "ssnmc/chart.hpp"
#include "ssnmc/connections.hpp"
#include "ssnmc/curvature.hpp"
#include "ssnmc/conformal.hpp"
#include "ssnmc/catalog.hpp"
#include "ssnmc/suite.hpp"
