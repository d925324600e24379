#pragma once

#include "dolha/analytics.hpp"
#include "dolha/audit.hpp"
#include "dolha/dump.hpp"
#include "dolha/generator.hpp"
#include "dolha/hash.hpp"
#include "dolha/persistent_store.hpp"
#include "dolha/snapshot_store.hpp"
#include "dolha/space.hpp"
#include "dolha/stream_io.hpp"
#include "dolha/types.hpp"
