#pragma once

#include <hmsos/baselines.hpp>
#include <hmsos/benchmarks.hpp>
#include <hmsos/clustering.hpp>
#include <hmsos/config.hpp>
#include <hmsos/core.hpp>
#include <hmsos/harness.hpp>
#include <hmsos/hms.hpp>
#include <hmsos/hms_os.hpp>
#include <hmsos/levy.hpp>
#include <hmsos/stats.hpp>
