#pragma once

#include "survmed/composite.hpp"
#include "survmed/discrete.hpp"
#include "survmed/inference.hpp"
#include "survmed/io.hpp"
#include "survmed/paradox.hpp"
#include "survmed/report.hpp"
#include "survmed/strata.hpp"
