#pragma once

#include "sitnet/error.hpp"
#include "sitnet/generators.hpp"
#include "sitnet/intersection.hpp"
#include "sitnet/io.hpp"
#include "sitnet/network.hpp"
#include "sitnet/path_measure.hpp"
#include "sitnet/random.hpp"
#include "sitnet/report.hpp"
#include "sitnet/scan.hpp"
#include "sitnet/solver.hpp"
#include "sitnet/types.hpp"
