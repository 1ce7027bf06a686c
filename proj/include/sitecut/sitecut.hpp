#pragma once

#include "sitecut/certifier.hpp"
#include "sitecut/cutset.hpp"
#include "sitecut/enumeration.hpp"
#include "sitecut/errors.hpp"
#include "sitecut/events.hpp"
#include "sitecut/exact.hpp"
#include "sitecut/fan.hpp"
#include "sitecut/graph.hpp"
#include "sitecut/monte_carlo.hpp"
#include "sitecut/union_find.hpp"
