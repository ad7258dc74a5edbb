#pragma once

#include "tractrix/curve.hpp"
#include "tractrix/errors.hpp"
#include "tractrix/flow.hpp"
#include "tractrix/glued.hpp"
#include "tractrix/gradient_flow.hpp"
#include "tractrix/lipschitz.hpp"
#include "tractrix/minimize.hpp"
#include "tractrix/parallel.hpp"
#include "tractrix/point.hpp"
#include "tractrix/random.hpp"
#include "tractrix/retractions.hpp"
#include "tractrix/samplers.hpp"
#include "tractrix/space.hpp"
#include "tractrix/spaces/cone.hpp"
#include "tractrix/spaces/euclidean.hpp"
#include "tractrix/spaces/join.hpp"
#include "tractrix/spaces/product.hpp"
#include "tractrix/spaces/sphere.hpp"
#include "tractrix/stats.hpp"
#include "tractrix/subset.hpp"
#include "tractrix/trajectory.hpp"
