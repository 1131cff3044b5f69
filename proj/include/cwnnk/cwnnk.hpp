#pragma once

#include "cwnnk/channels.hpp"
#include "cwnnk/error.hpp"
#include "cwnnk/features.hpp"
#include "cwnnk/io.hpp"
#include "cwnnk/kernel.hpp"
#include "cwnnk/knn.hpp"
#include "cwnnk/nnk.hpp"
#include "cwnnk/overlap.hpp"
#include "cwnnk/parallel.hpp"
#include "cwnnk/pipeline.hpp"
#include "cwnnk/report.hpp"
#include "cwnnk/synthetic.hpp"
#include "cwnnk/theorems.hpp"
