#pragma once

#include "dirac/numeric.hpp"
#include "dirac/subspace.hpp"
#include "dirac/structure.hpp"
#include "dirac/transfer.hpp"
#include "dirac/io_structure.hpp"
#include "dirac/dynamics.hpp"
#include "dirac/models.hpp"
