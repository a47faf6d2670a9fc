#pragma once

#include "microlocal/towers/constant_complexes.hpp"
#include "microlocal/towers/constant_sets.hpp"
#include "microlocal/towers/mittag_leffler.hpp"
#include "microlocal/towers/shadow.hpp"
#include "microlocal/towers/tower.hpp"
#include "microlocal/towers/values.hpp"
