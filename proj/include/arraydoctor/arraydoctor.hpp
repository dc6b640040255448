#pragma once

#include <arraydoctor/array_model.hpp>
#include <arraydoctor/block_recovery.hpp>
#include <arraydoctor/blockage.hpp>
#include <arraydoctor/config.hpp>
#include <arraydoctor/core.hpp>
#include <arraydoctor/group_complete.hpp>
#include <arraydoctor/joint_diagnosis.hpp>
#include <arraydoctor/metrics.hpp>
#include <arraydoctor/parallel.hpp>
#include <arraydoctor/pattern_stats.hpp>
#include <arraydoctor/recovery.hpp>
#include <arraydoctor/scenario.hpp>
#include <arraydoctor/sensing.hpp>
#include <arraydoctor/solver.hpp>
