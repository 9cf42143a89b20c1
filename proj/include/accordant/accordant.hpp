#pragma once

// Umbrella header.

#include "accordant/akmeans.hpp"
#include "accordant/analysis.hpp"
#include "accordant/clustering.hpp"
#include "accordant/dataset.hpp"
#include "accordant/error.hpp"
#include "accordant/kmeans.hpp"
#include "accordant/matrix.hpp"
#include "accordant/oracle.hpp"
#include "accordant/params.hpp"
#include "accordant/restarts.hpp"
#include "accordant/rng.hpp"
#include "accordant/io/csv.hpp"
#include "accordant/io/result.hpp"
#include "accordant/io/synth.hpp"
