#pragma once

// Faceted vocabulary engine: typed-relation composition algebra, closure
// and constraint inference, boolean retrieval over post-coordinate indexes,
// and the text formats tying them together.

#include "kos/dot.hpp"
#include "kos/errors.hpp"
#include "kos/inference.hpp"
#include "kos/io.hpp"
#include "kos/model.hpp"
#include "kos/relations.hpp"
#include "kos/retrieval.hpp"
