#pragma once

#include "microlocal/cellsheaf/complex.hpp"
#include "microlocal/cellsheaf/deformation.hpp"
#include "microlocal/cellsheaf/sections.hpp"
#include "microlocal/cellsheaf/sheaf.hpp"
