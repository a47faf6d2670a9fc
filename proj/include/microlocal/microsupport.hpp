#pragma once

#include "microlocal/microsupport/fan.hpp"
#include "microlocal/microsupport/micro_support.hpp"
