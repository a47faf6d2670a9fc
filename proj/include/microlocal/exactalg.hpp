#pragma once

#include "microlocal/exactalg/complex.hpp"
#include "microlocal/exactalg/matrix.hpp"
#include "microlocal/exactalg/module.hpp"
#include "microlocal/exactalg/ring.hpp"
#include "microlocal/exactalg/smith.hpp"
