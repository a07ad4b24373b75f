#pragma once

#include "logconn/types.hpp"
#include "logconn/errors.hpp"
#include "logconn/spectral.hpp"
#include "logconn/matfun.hpp"
#include "logconn/conjugacy.hpp"
#include "logconn/jordan.hpp"
#include "logconn/grading.hpp"
#include "logconn/ode.hpp"
#include "logconn/connection.hpp"
#include "logconn/local.hpp"
#include "logconn/datum.hpp"
#include "logconn/fuchsian.hpp"
#include "logconn/io.hpp"
