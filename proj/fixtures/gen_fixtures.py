#!/usr/bin/env python3
# Copyright 2026 The NpuPlan Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ==============================================================================
"""Regenerates the network documents in this directory.

Run from anywhere: python3 fixtures/gen_fixtures.py
"""

import json
import os


class Net:

  def __init__(self, name, input_hwc):
    self.name = name
    self.input = list(input_hwc)
    self.layers = []
    self.edges = []
    self.add('input', 'input')

  def add(self, name, kind, srcs=(), kernel=None, stride=None, pad=None,
          out_channels=None, activation=None):
    rec = {'name': name, 'kind': kind}
    if kernel is not None:
      rec['kernel'] = list(kernel)
    if stride is not None:
      rec['stride'] = list(stride)
    if pad is not None:
      rec['pad'] = list(pad)
    if out_channels is not None:
      rec['out_channels'] = out_channels
    if activation is not None:
      rec['activation'] = activation
    self.layers.append(rec)
    for s in srcs:
      self.edges.append({'src': s, 'dst': name})
    return name

  def conv(self, name, src, c, kh, kw=None, s=1, ph=None, pw=None):
    kw = kh if kw is None else kw
    ph = (kh - 1) // 2 if ph is None else ph
    pw = (kw - 1) // 2 if pw is None else pw
    return self.add(name, 'convolution', [src], [kh, kw], [s, s], [ph, pw],
                    c, 'relu')

  def pool(self, name, src, kind, k, s, p):
    return self.add(name, 'pooling-' + kind, [src], [k, k], [s, s], [p, p])

  def doc(self):
    return {'name': self.name, 'input': self.input, 'layers': self.layers,
            'edges': self.edges}


def inception_v3():
  n = Net('inception_v3', [299, 299, 3])
  x = n.conv('stem/conv1', 'input', 32, 3, s=2, ph=0, pw=0)
  x = n.conv('stem/conv2', x, 32, 3, ph=0, pw=0)
  x = n.conv('stem/conv3', x, 64, 3)
  x = n.pool('stem/pool1', x, 'max', 3, 2, 0)
  x = n.conv('stem/conv4', x, 80, 1)
  x = n.conv('stem/conv5', x, 192, 3, ph=0, pw=0)
  x = n.pool('stem/pool2', x, 'max', 3, 2, 0)

  def inc_a(m, src, pool_features):
    b1 = n.conv(m + '/branch1x1/conv', src, 64, 1)
    b2 = n.conv(m + '/branch5x5/conv1', src, 48, 1)
    b2 = n.conv(m + '/branch5x5/conv2', b2, 64, 5)
    b3 = n.conv(m + '/branch3x3dbl/conv1', src, 64, 1)
    b3 = n.conv(m + '/branch3x3dbl/conv2', b3, 96, 3)
    b3 = n.conv(m + '/branch3x3dbl/conv3', b3, 96, 3)
    b4 = n.pool(m + '/branch_pool/pool', src, 'avg', 3, 1, 1)
    b4 = n.conv(m + '/branch_pool/conv', b4, pool_features, 1)
    return n.add(m + '/concat', 'concatenation', [b1, b2, b3, b4])

  def red_a(m, src):
    b1 = n.conv(m + '/branch3x3/conv', src, 384, 3, s=2, ph=0, pw=0)
    b2 = n.conv(m + '/branch3x3dbl/conv1', src, 64, 1)
    b2 = n.conv(m + '/branch3x3dbl/conv2', b2, 96, 3)
    b2 = n.conv(m + '/branch3x3dbl/conv3', b2, 96, 3, s=2, ph=0, pw=0)
    b3 = n.pool(m + '/branch_pool/pool', src, 'max', 3, 2, 0)
    return n.add(m + '/concat', 'concatenation', [b1, b2, b3])

  def inc_b(m, src, c7):
    b1 = n.conv(m + '/branch1x1/conv', src, 192, 1)
    b2 = n.conv(m + '/branch7x7/conv1', src, c7, 1)
    b2 = n.conv(m + '/branch7x7/conv2', b2, c7, 1, 7)
    b2 = n.conv(m + '/branch7x7/conv3', b2, 192, 7, 1)
    b3 = n.conv(m + '/branch7x7dbl/conv1', src, c7, 1)
    b3 = n.conv(m + '/branch7x7dbl/conv2', b3, c7, 7, 1)
    b3 = n.conv(m + '/branch7x7dbl/conv3', b3, c7, 1, 7)
    b3 = n.conv(m + '/branch7x7dbl/conv4', b3, c7, 7, 1)
    b3 = n.conv(m + '/branch7x7dbl/conv5', b3, 192, 1, 7)
    b4 = n.pool(m + '/branch_pool/pool', src, 'avg', 3, 1, 1)
    b4 = n.conv(m + '/branch_pool/conv', b4, 192, 1)
    return n.add(m + '/concat', 'concatenation', [b1, b2, b3, b4])

  def red_b(m, src):
    b1 = n.conv(m + '/branch3x3/conv1', src, 192, 1)
    b1 = n.conv(m + '/branch3x3/conv2', b1, 320, 3, s=2, ph=0, pw=0)
    b2 = n.conv(m + '/branch7x7x3/conv1', src, 192, 1)
    b2 = n.conv(m + '/branch7x7x3/conv2', b2, 192, 1, 7)
    b2 = n.conv(m + '/branch7x7x3/conv3', b2, 192, 7, 1)
    b2 = n.conv(m + '/branch7x7x3/conv4', b2, 192, 3, s=2, ph=0, pw=0)
    b3 = n.pool(m + '/branch_pool/pool', src, 'max', 3, 2, 0)
    return n.add(m + '/concat', 'concatenation', [b1, b2, b3])

  def inc_c(m, src):
    b1 = n.conv(m + '/branch1x1/conv', src, 320, 1)
    s2 = n.conv(m + '/branch3x3/conv1', src, 384, 1)
    a = n.conv(m + '/branch3x3/conv2a', s2, 384, 1, 3)
    b = n.conv(m + '/branch3x3/conv2b', s2, 384, 3, 1)
    b2 = n.add(m + '/branch3x3/concat', 'concatenation', [a, b])
    s3 = n.conv(m + '/branch3x3dbl/conv1', src, 448, 1)
    s3 = n.conv(m + '/branch3x3dbl/conv2', s3, 384, 3)
    a = n.conv(m + '/branch3x3dbl/conv3a', s3, 384, 1, 3)
    b = n.conv(m + '/branch3x3dbl/conv3b', s3, 384, 3, 1)
    b3 = n.add(m + '/branch3x3dbl/concat', 'concatenation', [a, b])
    b4 = n.pool(m + '/branch_pool/pool', src, 'avg', 3, 1, 1)
    b4 = n.conv(m + '/branch_pool/conv', b4, 192, 1)
    return n.add(m + '/concat', 'concatenation', [b1, b2, b3, b4])

  x = inc_a('inception-a1', x, 32)
  x = inc_a('inception-a2', x, 64)
  x = inc_a('inception-a3', x, 64)
  x = red_a('reduction-a', x)
  x = inc_b('inception-b1', x, 128)
  x = inc_b('inception-b2', x, 160)
  x = inc_b('inception-b3', x, 160)
  x = inc_b('inception-b4', x, 192)
  x = red_b('reduction-b', x)
  x = inc_c('inception-c1', x)
  x = inc_c('inception-c2', x)
  x = n.pool('head/avgpool', x, 'avg', 8, 1, 0)
  x = n.add('head/fc', 'fully-connected', [x], out_channels=1000)
  n.add('output', 'output', [x])
  return n.doc()


def resnet50():
  n = Net('resnet50', [224, 224, 3])
  x = n.conv('conv1', 'input', 64, 7, s=2, ph=3, pw=3)
  x = n.pool('maxpool', x, 'max', 3, 2, 1)
  for stage, (blocks, width) in enumerate([(3, 64), (4, 128), (6, 256),
                                           (3, 512)], start=1):
    for i in range(blocks):
      m = 'layer%d.%d' % (stage, i)
      stride = 2 if (i == 0 and stage > 1) else 1
      y = n.conv(m + '/conv1', x, width, 1)
      y = n.conv(m + '/conv2', y, width, 3, s=stride)
      y = n.add(m + '/conv3', 'convolution', [y], [1, 1], [1, 1], [0, 0],
                width * 4)
      short = x
      if i == 0:
        short = n.add(m + '/downsample', 'convolution', [x], [1, 1],
                      [stride, stride], [0, 0], width * 4)
      x = n.add(m + '/add', 'elementwise-add', [y, short], activation='relu')
  x = n.pool('avgpool', x, 'avg', 7, 1, 0)
  x = n.add('fc', 'fully-connected', [x], out_channels=1000)
  n.add('output', 'output', [x])
  return n.doc()


def encoder_decoder():
  # A short residual block followed by a twelve-layer trunk whose input is
  # concatenated back at the end.
  n = Net('encoder_decoder', [32, 32, 16])
  x = n.conv('enc/conv0', 'input', 16, 3)
  a = n.conv('enc/block/conv1', x, 16, 3)
  a = n.conv('enc/block/conv2', a, 16, 3)
  x = n.add('enc/block/add', 'elementwise-add', [a, x])
  skip = x
  for i in range(1, 13):
    x = n.conv('trunk/conv%d' % i, x, 16, 3)
  x = n.add('dec/concat', 'concatenation', [x, skip])
  x = n.conv('dec/conv_out', x, 8, 1)
  n.add('output', 'output', [x])
  return n.doc()


def toy_concat():
  n = Net('toy_concat', [16, 16, 8])
  x = n.conv('stem', 'input', 8, 3)
  b1 = n.conv('mod/b1/conv', x, 8, 1)
  b2 = n.conv('mod/b2/conv1', x, 4, 1)
  b2 = n.conv('mod/b2/conv2', b2, 8, 3)
  b3 = n.pool('mod/b3/pool', x, 'max', 3, 1, 1)
  x = n.add('mod/concat', 'concatenation', [b1, b2, b3])
  x = n.conv('head', x, 4, 1)
  n.add('output', 'output', [x])
  return n.doc()


def toy_chain():
  n = Net('toy_chain', [8, 8, 4])
  x = n.conv('a', 'input', 4, 3)
  x = n.conv('b', x, 4, 3)
  x = n.conv('c', x, 4, 3)
  n.add('output', 'output', [x])
  return n.doc()


def toy_cycle():
  n = Net('toy_cycle', [8, 8, 4])
  n.conv('a', 'input', 4, 3)
  n.conv('b', 'a', 4, 3)
  n.edges.append({'src': 'b', 'dst': 'a'})
  return n.doc()


def main():
  here = os.path.dirname(os.path.abspath(__file__))
  docs = {
      'inception_v3.json': inception_v3(),
      'resnet50.json': resnet50(),
      'encoder_decoder.json': encoder_decoder(),
      'toy_concat.json': toy_concat(),
      'toy_chain.json': toy_chain(),
      'toy_cycle.json': toy_cycle(),
  }
  for name, doc in docs.items():
    with open(os.path.join(here, name), 'w') as f:
      json.dump(doc, f, indent=1)
      f.write('\n')


if __name__ == '__main__':
  main()
