const assert = require("assert");
const f = require("./_load.js")();
assert.strictEqual(f("(a(b)c)"), true);
assert.strictEqual(f(")("), false);
assert.strictEqual(f("(()"), false);
