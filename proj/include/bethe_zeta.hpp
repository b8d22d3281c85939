#pragma once

#include "bethe_zeta/analysis.hpp"
#include "bethe_zeta/bethe.hpp"
#include "bethe_zeta/error.hpp"
#include "bethe_zeta/fixed_points.hpp"
#include "bethe_zeta/graph.hpp"
#include "bethe_zeta/io.hpp"
#include "bethe_zeta/lbp.hpp"
#include "bethe_zeta/linalg.hpp"
#include "bethe_zeta/model.hpp"
#include "bethe_zeta/oracle.hpp"
#include "bethe_zeta/parallel.hpp"
#include "bethe_zeta/prime_cycles.hpp"
#include "bethe_zeta/reduction.hpp"
#include "bethe_zeta/spanning_trees.hpp"
#include "bethe_zeta/spectral.hpp"
#include "bethe_zeta/zeta.hpp"
#include "bethe_zeta/verify.hpp"
