const assert = require("assert");
const f = require("./_load.js")();
assert.ok(Math.abs(f([1, 2, 3, 4]) - 1.0) < 1e-12);
assert.ok(Math.abs(f([5, 5])) < 1e-12);
