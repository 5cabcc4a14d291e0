const assert = require("assert");
const f = require("./_load.js")();
assert.strictEqual(f("AbCdE"), 0.4);
assert.strictEqual(f(""), 0);
