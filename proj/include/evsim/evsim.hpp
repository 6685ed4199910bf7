#pragma once

#include "evsim/units.hpp"
#include "evsim/vehicle_params.hpp"
#include "evsim/drive_cycle.hpp"
#include "evsim/driver_control.hpp"
#include "evsim/powertrain.hpp"
#include "evsim/longitudinal_dynamics.hpp"
#include "evsim/sim_engine.hpp"
#include "evsim/experiments.hpp"
#include "evsim/report_io.hpp"
#include "evsim/svg_plot.hpp"
