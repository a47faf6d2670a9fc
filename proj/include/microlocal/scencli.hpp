#pragma once

#include "microlocal/scencli/corpus.hpp"
#include "microlocal/scencli/json_io.hpp"
#include "microlocal/scencli/report.hpp"
#include "microlocal/scencli/run.hpp"
#include "microlocal/scencli/scenario.hpp"
