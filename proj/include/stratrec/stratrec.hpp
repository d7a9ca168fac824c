#pragma once

#include "stratrec/errors.hpp"
#include "stratrec/model.hpp"
#include "stratrec/random.hpp"
#include "stratrec/workforce.hpp"
#include "stratrec/batchstrat.hpp"
#include "stratrec/spatial_index.hpp"
#include "stratrec/adpar.hpp"
#include "stratrec/synthgen.hpp"
#include "stratrec/text_io.hpp"
#include "stratrec/stats.hpp"
#include "stratrec/harness.hpp"
