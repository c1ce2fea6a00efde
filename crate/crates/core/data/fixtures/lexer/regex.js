#!/usr/bin/env node
// first comment
const re = /\/\/ not a comment/g; // after regex
const ratio = a / b / c; // division
const t = `template ${ "/*" } still // template`; /* block */
const u = 'single // quoted';
/* multi
   line */
