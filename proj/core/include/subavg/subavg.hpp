#pragma once

#include "subavg/errors.hpp"
#include "subavg/linalg.hpp"
#include "subavg/grassmann.hpp"
#include "subavg/karcher.hpp"
#include "subavg/blindid.hpp"
