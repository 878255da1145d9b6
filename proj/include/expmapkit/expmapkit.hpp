#pragma once

#include "expmapkit/address.hpp"
#include "expmapkit/core.hpp"
#include "expmapkit/errors.hpp"
#include "expmapkit/grid_io.hpp"
#include "expmapkit/partition.hpp"
#include "expmapkit/probe.hpp"
#include "expmapkit/ray.hpp"
#include "expmapkit/tower.hpp"
#include "expmapkit/verify.hpp"
